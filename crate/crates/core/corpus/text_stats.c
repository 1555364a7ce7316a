#include <ctype.h>
#include <stdio.h>
#include <string.h>

int main(void)
{
    char text[] = "The quick brown fox jumps over the lazy dog, 42 times in 2024!";
    char upper[sizeof text];
    int letters = 0, digits = 0, spaces = 0;
    size_t len = strlen(text);

    for (size_t i = 0; i < len; i++) {
        if (isalpha((unsigned char)text[i]))
            letters++;
        else if (isdigit((unsigned char)text[i]))
            digits++;
        else if (text[i] == ' ')
            spaces++;
    }

    for (size_t i = 0; i <= len; i++)
        upper[i] = (char)toupper((unsigned char)text[i]);

    printf("%d %d %d %s\n", letters, digits, spaces, upper);
    return 0;
}
