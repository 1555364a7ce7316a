#include <stdio.h>

int main(void)
{
    int m[16][16];
    int fi = -1, fj = -1;
    long acc = 0;

    for (int i = 0; i < 16; i++)
        for (int j = 0; j < 16; j++)
            m[i][j] = (i * 16 + j) * 13 % 97;

    for (int i = 0; i < 16; i++)
        for (int j = 0; j < 16; j++)
            if (m[i][j] == 42) {
                fi = i;
                fj = j;
                goto found;
            }
found:
    for (int i = 0; i < 16; i++)
        acc += m[i][i];

    printf("goto_search %d %d %ld\n", fi, fj, acc);
    return 0;
}
