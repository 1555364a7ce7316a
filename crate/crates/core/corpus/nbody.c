#include <math.h>
#include <stdio.h>

#define NB 16

double px[NB], py[NB], vx[NB], vy[NB], mass[NB];

int main(void)
{
    const double g = 0.01, dt = 0.05;

    for (int i = 0; i < NB; i++) {
        px[i] = cos(i * 0.4) * (1.0 + i * 0.1);
        py[i] = sin(i * 0.4) * (1.0 + i * 0.1);
        vx[i] = vy[i] = 0.0;
        mass[i] = 1.0 + (i % 3);
    }

    for (int step = 0; step < 30; step++) {
        for (int i = 0; i < NB; i++) {
            double ax = 0.0, ay = 0.0;
            for (int j = 0; j < NB; j++) {
                if (j == i)
                    continue;
                double dx = px[j] - px[i], dy = py[j] - py[i];
                double r = sqrt(dx * dx + dy * dy + 1e-3);
                ax += g * mass[j] * dx / (r * r * r);
                ay += g * mass[j] * dy / (r * r * r);
            }
            vx[i] += ax * dt;
            vy[i] += ay * dt;
        }
        for (int i = 0; i < NB; i++) {
            px[i] += vx[i] * dt;
            py[i] += vy[i] * dt;
        }
    }

    printf("nbody %.9f %.9f\n", px[3], py[11]);
    return 0;
}
