#include <stdio.h>
#include <stdlib.h>

int main(void)
{
    int rows = 30, cols = 25;
    double *M = malloc(sizeof(double) * rows * cols);
    double *x = malloc(sizeof(double) * cols);
    double *y = calloc(rows, sizeof(double));
    double norm = 0.0;

    for (int r = 0; r < rows; r++)
        for (int c = 0; c < cols; c++)
            M[r * cols + c] = (r + 1.0) / (c + 1.0);
    for (int c = 0; c < cols; c++)
        x[c] = c % 2 ? -1.0 : 1.0;

    for (int r = 0; r < rows; r++) {
        double acc = 0.0;
        for (int c = 0; c < cols; c++)
            acc += M[r * cols + c] * x[c];
        y[r] = acc;
    }

    for (int r = 0; r < rows; r++)
        norm += y[r] * y[r];

    printf("matvec %.8f %.8f\n", norm, y[rows - 1]);
    free(M);
    free(x);
    free(y);
    return 0;
}
