#include <stdio.h>

int main(void)
{
    int ops[40];
    int acc = 0, sq = 0;

    for (int i = 0; i < 40; i++)
        ops[i] = (i * 7) % 4;

    for (int i = 0; i < 40; i++) {
        switch (ops[i]) {
        case 0:
            acc += i;
            break;
        case 1:
            acc -= 1;
            break;
        default:
            acc *= 1;
        }
    }

    for (int i = 0; i < 40; i++)
        sq += ops[i] * ops[i];

    printf("switch_loop %d %d\n", acc, sq);
    return 0;
}
