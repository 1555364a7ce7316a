#include <stdio.h>

#define N 48

static double A[N][N];

void init_matrix(int n, double M[n][n])
{
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
            M[i][j] = (double)((i + 1) * (j + 2) % 17) / 17.0;

    for (int i = 0; i < n; i++)
        M[i][i] += (double)n;
}

double decompose(int n, double M[n][n])
{
    double trace = 0.0;

    for (int k = 0; k < n; k++) {
        for (int i = k + 1; i < n; i++) {
            M[i][k] /= M[k][k];
            for (int j = k + 1; j < n; j++)
                M[i][j] -= M[i][k] * M[k][j];
        }
    }

    for (int i = 0; i < n; i++)
        trace += M[i][i];
    return trace;
}

int main(void)
{
    init_matrix(N, A);
    printf("lu trace %.10f\n", decompose(N, A));
    printf("lu corner %.10f %.10f\n", A[0][N - 1], A[N - 1][0]);
    return 0;
}
