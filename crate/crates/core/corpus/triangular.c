#include <stdio.h>

#define N 60

double L[N][N];

int main(void)
{
    double b[N], x[N];
    int skipped = 0;

    for (int i = 0; i < N; i++) {
        for (int j = 0; j <= i; j++)
            L[i][j] = (i == j) ? 2.0 : 1.0 / (i + j + 1);
        b[i] = i + 1.0;
    }

    for (int i = 0; i < N; i++) {
        double s = b[i];
        for (int j = 0; j < i; j++) {
            if (L[i][j] < 1e-3) {
                skipped++;
                continue;
            }
            s -= L[i][j] * x[j];
        }
        x[i] = s / L[i][i];
    }

    int last = 0;
    for (int i = 0; i < N; i++) {
        if (x[i] < 0.0)
            break;
        last = i;
    }

    printf("triangular %.10f %d %d\n", x[N - 1], skipped, last);
    return 0;
}
