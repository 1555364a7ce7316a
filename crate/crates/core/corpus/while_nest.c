#include <stdio.h>

int main(void)
{
    double x[40];
    double err = 1.0;
    int iters = 0;

    for (int i = 0; i < 40; i++)
        x[i] = (i * i) % 7;

    while (err > 1e-3) {
        err = 0.0;
        for (int i = 1; i < 39; i++) {
            double nx = 0.5 * (x[i - 1] + x[i + 1]);
            double d = nx > x[i] ? nx - x[i] : x[i] - nx;
            if (d > err)
                err = d;
            x[i] = nx;
        }
        iters++;
    }

    int k = 0;
    do {
        for (int i = 0; i < 40; i++)
            x[i] *= 0.5;
        k++;
    } while (k < 3);

    printf("while_nest iters %d x20 %.6f\n", iters, x[20]);
    return 0;
}
