#include <stdio.h>

#define N 500

double a[N], b[N];

int main(void)
{
    double dot = 0.0, tmp = 0.0;
    int i;

    for (i = 0; i < N; i++) {
        a[i] = i * 0.5;
        b[i] = (N - i) * 0.25;
    }

#pragma omp parallel for private(i) reduction(+:dot)
    for (i = 0; i < N; i++)
        dot += a[i] * b[i];

#pragma omp parallel for private(tmp)
    for (int j = 0; j < N; j++) {
        tmp = a[j] + b[j];
        a[j] = tmp * 0.5;
    }

    printf("omp_sum %.4f %.4f\n", dot, a[N / 2]);
    return 0;
}
