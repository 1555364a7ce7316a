#include <stdio.h>

#define N 64
#define STEPS 20

double grid[N][N];
double next[N][N];

int main(void)
{
    int i, j, t;
    double total = 0.0;

    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++)
            grid[i][j] = (double)((i * 7 + j * 3) % 11) / 10.0;

    for (t = 0; t < STEPS; t++) {
        for (i = 1; i < N - 1; i++)
            for (j = 1; j < N - 1; j++)
                next[i][j] = 0.2 * (grid[i][j] + grid[i - 1][j] + grid[i + 1][j]
                                    + grid[i][j - 1] + grid[i][j + 1]);
        for (i = 1; i < N - 1; i++)
            for (j = 1; j < N - 1; j++)
                grid[i][j] = next[i][j];
    }

    for (i = 0; i < N; i++)
        for (j = 0; j < N; j++)
            total += grid[i][j];

    printf("stencil2d checksum %.10f\n", total);
    return 0;
}
