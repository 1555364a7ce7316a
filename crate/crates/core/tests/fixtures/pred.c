#include <stdio.h>

#define N 128

float x[N], y[N];

int main(void)
{
    float dot = 0.0f;

    for (int i = 0; i < N; i++) {
        x[i] = (float)i;
        y[i] = 2.0f * i;
    }

    for (int i = 0; i < N; i++)
        y[i] = 3.0f * x[i] + y[i];

    for (int i = 0; i < N; i++)
        dot += x[i] * y[i];

    printf("%.1f\n", dot);
    return 0;
}
