#include <stdio.h>

#define LEN 1000

float data[LEN];

int main(void)
{
    float sum = 0.0f, lo, hi;
    long count = 0;
    int argmax = 0;

    for (int i = 0; i < LEN; i++)
        data[i] = (float)((i * 37) % 101) - 50.0f;

    lo = data[0];
    hi = data[0];
    for (int i = 0; i < LEN; i++) {
        sum += data[i];
        if (data[i] < lo)
            lo = data[i];
        if (data[i] > hi) {
            hi = data[i];
            argmax = i;
        }
        if (data[i] > 0.0f)
            count++;
    }

    printf("sum %.3f min %.1f max %.1f at %d positive %ld\n", sum, lo, hi, argmax, count);
    return 0;
}
