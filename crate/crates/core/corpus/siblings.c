#include <stdio.h>

int main(void)
{
    int a[100], b[100], c[100];
    int n = 100;
    long dot = 0;

    for (int i = 0; i < n; i++)
        a[i] = i * 3;
    for (int i = 0; i < n; i++)
        b[i] = 100 - i;
    for (int i = 0; i < n; i++)
        c[i] = a[i] + b[i];
    for (int i = 0; i < n; i++)
        dot += (long)a[i] * c[i];

    printf("siblings %ld %d %d\n", dot, c[0], c[n - 1]);
    return 0;
}
