#include <stdio.h>

long accumulate(int n)
{
    static long total = 0;
    for (int i = 0; i < n; i++)
        total += i;
    return total;
}

int main(void)
{
    long last = 0;
    int sizes[5] = { 3, 10, 7, 1, 20 };

    for (int k = 0; k < 5; k++)
        last = accumulate(sizes[k]);

    printf("local_static %ld\n", last);
    return 0;
}
