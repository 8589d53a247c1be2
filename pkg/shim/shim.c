/* Benchmark driver linked with one generated kernel per binary.
 *
 * Contract: argv[1] is the iteration count; the data buffer is
 * RVVPROBE_BUFFER_BYTES large (from the kernel's metadata sidecar,
 * injected at compile time) and 64-byte aligned; stdout carries exactly
 * two lines, elapsed_ns=<u64> and iterations=<u64>. Exit codes:
 * 0 success, 1 bad argument, 2 allocation failure.
 *
 * The driver adds no vector instructions of its own and retires far
 * under 1e5 instructions, so it vanishes inside a default-scale run.
 * Timing wraps only the kernel call (monotonic clock, nanoseconds);
 * counters collected by the wrapping perf invocation cover the whole
 * process, whose cost the measurement loop dominates.
 */
#include <inttypes.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <time.h>

#ifndef RVVPROBE_BUFFER_BYTES
#define RVVPROBE_BUFFER_BYTES 16384ull
#endif

#define RVVPROBE_BUFFER_ALIGN 64

void rvvprobe_kernel(uint64_t iterations, void *buffer);

static uint64_t now_ns(void)
{
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (uint64_t)ts.tv_sec * 1000000000ull + (uint64_t)ts.tv_nsec;
}

int main(int argc, char **argv)
{
    if (argc != 2) {
        fprintf(stderr, "usage: %s <iterations>\n", argv[0]);
        return 1;
    }
    char *end = NULL;
    uint64_t iterations = strtoull(argv[1], &end, 10);
    if (end == argv[1] || *end != '\0') {
        fprintf(stderr, "bad iteration count: %s\n", argv[1]);
        return 1;
    }

    /* size is kept a multiple of the alignment by the generator */
    void *buffer = aligned_alloc(RVVPROBE_BUFFER_ALIGN, (size_t)RVVPROBE_BUFFER_BYTES);
    if (buffer == NULL) {
        fprintf(stderr, "cannot allocate %llu buffer bytes\n",
                (unsigned long long)RVVPROBE_BUFFER_BYTES);
        return 2;
    }
    memset(buffer, 0, (size_t)RVVPROBE_BUFFER_BYTES);

#ifdef RVVPROBE_WARMUP
    /* optional build-time toggle for memory kernels; arithmetic kernels
     * stage operands in registers and need no warm pass */
    rvvprobe_kernel(1, buffer);
#endif

    uint64_t t0 = now_ns();
    rvvprobe_kernel(iterations, buffer);
    uint64_t t1 = now_ns();

    printf("elapsed_ns=%" PRIu64 "\n", t1 - t0);
    printf("iterations=%" PRIu64 "\n", iterations);

    free(buffer);
    return 0;
}
