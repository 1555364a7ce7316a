#include <stdio.h>

#define LEN 256
#define K 5

const double kernel[K] = { 0.1, 0.2, 0.4, 0.2, 0.1 };

int main(void)
{
    double in[LEN], out[LEN];
    double energy = 0.0;

    for (int i = 0; i < LEN; i++)
        in[i] = (i % 16 < 8) ? 1.0 : -1.0;

    for (int i = 0; i < LEN; i++) {
        double acc = 0.0;
        for (int k = 0; k < K; k++) {
            int idx = i + k - K / 2;
            if (idx >= 0 && idx < LEN)
                acc += kernel[k] * in[idx];
        }
        out[i] = acc;
    }

    for (int i = 0; i < LEN; i++)
        energy += out[i] * out[i];

    printf("conv1d %.6f %.6f\n", energy, out[7]);
    return 0;
}
