#include <stdio.h>

#define N 32

static double weights[N];
double values[N];

static double square(double x)
{
    return x * x;
}

int main(void)
{
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;

    for (int i = 0; i < N; i++) {
        weights[i] = 1.0 / (i + 1);
        values[i] = i * 0.5;
    }
    for (int i = 0; i < N; i++)
        s1 += square(values[i]);
    for (int i = 0; i < N; i++)
        s2 += values[i] * 2.0;
    for (int i = 0; i < N; i++)
        s3 += weights[i];

    printf("statics %.6f %.6f %.6f\n", s1, s2, s3);
    return 0;
}
