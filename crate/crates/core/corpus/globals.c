#include <stdio.h>

int counter;
double scale = 2.5;
double samples[64];
int calls = 0;

void fill(void)
{
    for (int i = 0; i < 64; i++)
        samples[i] = (i % 9) * scale;
    calls++;
}

int main(void)
{
    double peak = 0.0;

    fill();
    for (int i = 0; i < 64; i++) {
        if (samples[i] > peak)
            peak = samples[i];
        counter += (int)samples[i];
    }
    scale = 1.0;
    for (int r = 0; r < 3; r++)
        for (int i = 0; i < 64; i++)
            samples[i] = samples[i] * 0.5 + scale;

    printf("globals %d %.3f %.6f calls %d\n", counter, peak, samples[10], calls);
    return 0;
}
