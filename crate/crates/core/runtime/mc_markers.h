/* Region markers for energy measurement.
 *
 * Without MC_ENERGY_PERFMON or MC_MARKER_TRACE every marker expands to
 * nothing. With MC_ENERGY_PERFMON they forward to the LIKWID marker API.
 * With MC_MARKER_TRACE each effective operation is logged to the file named
 * by $MC_MARKER_TRACE_OUT (stderr when unset).
 *
 * INIT and CLOSE may appear around every loop: only the first INIT takes
 * effect, and the first CLOSE defers the real close to process exit. */
#ifndef MC_MARKERS_H
#define MC_MARKERS_H

#if defined(MC_ENERGY_PERFMON) || defined(MC_MARKER_TRACE)

#include <stdio.h>
#include <stdlib.h>

#ifdef MC_ENERGY_PERFMON
#ifndef LIKWID_PERFMON
#define LIKWID_PERFMON
#endif
#include <likwid-marker.h>
#endif

/* shared by every object of the process: 0 fresh, 1 initialized, 2 close pending */
__attribute__((weak)) int mc_marker_state;
__attribute__((weak)) FILE *mc_marker_trace_file;

static void mc_marker_trace(const char *op, const char *region)
{
#ifdef MC_MARKER_TRACE
    if (!mc_marker_trace_file) {
        const char *path = getenv("MC_MARKER_TRACE_OUT");
        mc_marker_trace_file = (path && *path) ? fopen(path, "a") : stderr;
    }
    if (mc_marker_trace_file) {
        if (region)
            fprintf(mc_marker_trace_file, "%s %s\n", op, region);
        else
            fprintf(mc_marker_trace_file, "%s\n", op);
        fflush(mc_marker_trace_file);
    }
#else
    (void)op;
    (void)region;
#endif
}

static void mc_marker_close_now(void)
{
    mc_marker_trace("CLOSE", NULL);
#ifdef MC_ENERGY_PERFMON
    LIKWID_MARKER_CLOSE;
#endif
}

static void mc_marker_init(void)
{
    if (mc_marker_state != 0)
        return;
    mc_marker_state = 1;
    mc_marker_trace("INIT", NULL);
#ifdef MC_ENERGY_PERFMON
    LIKWID_MARKER_INIT;
#endif
}

static void mc_marker_start(const char *region)
{
    mc_marker_trace("START", region);
#ifdef MC_ENERGY_PERFMON
    LIKWID_MARKER_START(region);
#endif
}

static void mc_marker_stop(const char *region)
{
    mc_marker_trace("STOP", region);
#ifdef MC_ENERGY_PERFMON
    LIKWID_MARKER_STOP(region);
#endif
}

static void mc_marker_close(void)
{
    if (mc_marker_state != 1)
        return;
    mc_marker_state = 2;
    atexit(mc_marker_close_now);
}

#define MC_MARKER_INIT mc_marker_init()
#define MC_MARKER_START(region) mc_marker_start(region)
#define MC_MARKER_STOP(region) mc_marker_stop(region)
#define MC_MARKER_CLOSE mc_marker_close()

#else

#define MC_MARKER_INIT ((void)0)
#define MC_MARKER_START(region) ((void)0)
#define MC_MARKER_STOP(region) ((void)0)
#define MC_MARKER_CLOSE ((void)0)

#endif

#endif
