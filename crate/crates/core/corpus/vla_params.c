#include <stdio.h>

void transpose_add(int n, int m, double A[n][m], double B[m][n])
{
    for (int i = 0; i < n; i++)
        for (int j = 0; j < m; j++)
            B[j][i] += A[i][j];
}

double total(int n, int m, double X[n][m])
{
    double s = 0.0;
    for (int i = 0; i < n; i++)
        for (int j = 0; j < m; j++)
            s += X[i][j] * (i + 1);
    return s;
}

int main(void)
{
    int n = 12, m = 9;
    double A[12][9], B[9][12];

    for (int i = 0; i < n; i++)
        for (int j = 0; j < m; j++)
            A[i][j] = i - j * 0.25;
    for (int j = 0; j < m; j++)
        for (int i = 0; i < n; i++)
            B[j][i] = 1.0;

    transpose_add(n, m, A, B);
    printf("vla %.4f %.4f\n", total(n, m, A), total(m, n, B));
    return 0;
}
