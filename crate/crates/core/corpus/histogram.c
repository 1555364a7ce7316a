#include <stdio.h>

#define BINS 8

int main(void)
{
    unsigned int seed = 12345u;
    int hist[BINS] = { 0 };
    unsigned int vals[256];

    for (int i = 0; i < 256; i++) {
        seed = seed * 1103515245u + 12345u;
        vals[i] = (seed >> 16) & 0x7fff;
    }

    for (int i = 0; i < 256; i++) {
        int b = vals[i] % BINS;
        if (vals[i] & 1)
            hist[b] += 2;
        else
            hist[b]++;
    }

    for (int b = 0; b < BINS; b++)
        printf("%d ", hist[b]);
    printf("\nseed %u\n", seed);
    return 0;
}
