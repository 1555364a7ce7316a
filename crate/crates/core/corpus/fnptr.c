#include <stdio.h>

typedef double (*unary_fn)(double);

double twice(double x)
{
    return 2.0 * x;
}

double halve(double x)
{
    return 0.5 * x;
}

int main(void)
{
    unary_fn ops[2] = { twice, halve };
    double acc[20];
    unary_fn f = halve;

    for (int i = 0; i < 20; i++)
        acc[i] = ops[i % 2](i + 1.0);

    for (int i = 0; i < 20; i++)
        acc[i] = f(acc[i]) + twice(1.0);

    printf("fnptr %.4f %.4f\n", acc[0], acc[19]);
    return 0;
}
