#include <stdio.h>

int find_first(const int *v, int n, int key)
{
    for (int i = 0; i < n; i++)
        if (v[i] == key)
            return i;
    return -1;
}

int main(void)
{
    int v[64];
    int hits = 0;

    for (int i = 0; i < 64; i++)
        v[i] = (i * 5) % 23;

    for (int key = 0; key < 23; key++)
        if (find_first(v, 64, key) >= 0)
            hits++;

    printf("early_exit hits %d first7 %d\n", hits, find_first(v, 64, 7));
    return 0;
}
