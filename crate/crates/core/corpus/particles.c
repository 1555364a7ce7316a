#include <stdio.h>

typedef struct {
    double x, y;
    double vx, vy;
} particle_t;

struct box {
    double lo, hi;
};

#define NP 50

int main(void)
{
    particle_t p[NP];
    struct box bounds = { 0.0, 10.0 };
    double dt = 0.01;
    int bounces = 0;

    for (int i = 0; i < NP; i++) {
        p[i].x = (i % 10) * 1.0;
        p[i].y = (i / 10) * 2.0;
        p[i].vx = (i % 3) - 1.0;
        p[i].vy = (i % 5) * 0.5 - 1.0;
    }

    for (int step = 0; step < 200; step++) {
        for (int i = 0; i < NP; i++) {
            p[i].x += p[i].vx * dt;
            p[i].y += p[i].vy * dt;
            if (p[i].x < bounds.lo || p[i].x > bounds.hi) {
                p[i].vx = -p[i].vx;
                bounces++;
            }
            if (p[i].y < bounds.lo || p[i].y > bounds.hi) {
                p[i].vy = -p[i].vy;
                bounces++;
            }
        }
    }

    printf("particles %.6f %.6f bounces %d\n", p[7].x, p[NP - 1].y, bounces);
    return 0;
}
