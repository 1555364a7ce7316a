#include <stdio.h>

int main(void)
{
    long v[128], scan[128];
    long running = 0;

    for (int i = 0; i < 128; i++)
        v[i] = (i * 11) % 7 - 3;

    for (int i = 0; i < 128; i++) {
        running += v[i];
        scan[i] = running;
    }

    for (int i = 127; i > 0; i--)
        scan[i] -= scan[i - 1];

    printf("prefix_sum %ld %ld %ld\n", running, scan[5], scan[127]);
    return 0;
}
