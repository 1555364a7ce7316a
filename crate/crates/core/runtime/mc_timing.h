/* Per-loop timing records for profiling builds.
 *
 * Each call appends `MC\t<loop_id>\t<elapsed_ns>\n` to the file named by
 * $MC_PROFILE_OUT. Nothing is written when the variable is unset. */
#ifndef MC_TIMING_H
#define MC_TIMING_H

#include <stdio.h>
#include <stdlib.h>
#include <time.h>

static unsigned long long mc_clock_ns(void)
{
    struct timespec ts;
#ifdef CLOCK_MONOTONIC
    clock_gettime(CLOCK_MONOTONIC, &ts);
#else
    timespec_get(&ts, TIME_UTC);
#endif
    return (unsigned long long)ts.tv_sec * 1000000000ull + (unsigned long long)ts.tv_nsec;
}

static void mc_timing_record(const char *loop_id, unsigned long long elapsed_ns)
{
    static FILE *out;
    static int opened;
    if (!opened) {
        const char *path = getenv("MC_PROFILE_OUT");
        opened = 1;
        out = (path && *path) ? fopen(path, "a") : NULL;
    }
    if (out) {
        fprintf(out, "MC\t%s\t%llu\n", loop_id, elapsed_ns);
        fflush(out);
    }
}

#endif
