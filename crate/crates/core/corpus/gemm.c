#include <stdio.h>
#include <stdlib.h>

#define NI 40
#define NJ 36
#define NK 32

int main(void)
{
    double alpha = 1.5, beta = 1.2;
    double (*C)[NJ] = malloc(sizeof(double[NI][NJ]));
    double (*A)[NK] = malloc(sizeof(double[NI][NK]));
    double (*B)[NJ] = malloc(sizeof(double[NK][NJ]));
    double sum = 0.0;
    int i, j, k;

    for (i = 0; i < NI; i++) {
        for (j = 0; j < NJ; j++)
            C[i][j] = (double)((i * j + 1) % NI) / NI;
        for (k = 0; k < NK; k++)
            A[i][k] = (double)(i * (k + 1) % NK) / NK;
    }
    for (k = 0; k < NK; k++)
        for (j = 0; j < NJ; j++)
            B[k][j] = (double)(k * (j + 2) % NJ) / NJ;

    for (i = 0; i < NI; i++) {
        for (j = 0; j < NJ; j++)
            C[i][j] *= beta;
        for (k = 0; k < NK; k++)
            for (j = 0; j < NJ; j++)
                C[i][j] += alpha * A[i][k] * B[k][j];
    }

    for (i = 0; i < NI; i++)
        for (j = 0; j < NJ; j++)
            sum += C[i][j];
    printf("gemm sum %.10f\n", sum);

    free(A);
    free(B);
    free(C);
    return 0;
}
