#include <stdio.h>

typedef float real;

enum color { RED, GREEN, BLUE, NCOLORS };

int main(void)
{
    real weights[NCOLORS] = { 0.25f, 0.5f, 0.25f };
    int pixels[30];
    real score = 0.0f;
    int count[NCOLORS] = { 0 };

    for (int i = 0; i < 30; i++)
        pixels[i] = (i * 5 + 1) % NCOLORS;

    for (int i = 0; i < 30; i++) {
        enum color c = (enum color)pixels[i];
        if (c == BLUE)
            score += weights[BLUE] * 2.0f;
        else
            score += weights[c];
        count[c]++;
    }

    printf("enums %.3f %d %d %d\n", score, count[RED], count[GREEN], count[BLUE]);
    return 0;
}
