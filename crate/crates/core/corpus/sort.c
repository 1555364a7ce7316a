#include <stdio.h>

int main(void)
{
    int v[100];
    int n = 100;
    int swaps = 0;

    for (int i = 0; i < n; i++)
        v[i] = (i * 61 + 17) % 100;

    for (int i = 0; i < n - 1; i++) {
        int changed = 0;
        for (int j = 0; j < n - 1 - i; j++) {
            if (v[j] > v[j + 1]) {
                int t = v[j];
                v[j] = v[j + 1];
                v[j + 1] = t;
                swaps++;
                changed = 1;
            }
        }
        if (!changed)
            break;
    }

    printf("sort %d %d %d %d\n", v[0], v[50], v[99], swaps);
    return 0;
}
