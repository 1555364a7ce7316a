#include <stdio.h>
#include <stdlib.h>

int main(void)
{
    int n = 200;
    int *buf = malloc(n * sizeof *buf);
    int *p = buf;
    long s = 0;

    for (int i = 0; i < n; i++)
        *p++ = i * i % 31;

    p = buf;
    for (int i = 0; i < n / 2; i++) {
        s += *p;
        p += 2;
    }

    printf("pointer_walk %ld offset %ld\n", s, (long)(p - buf));
    free(buf);
    return 0;
}
