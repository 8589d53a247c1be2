/* Stream-like triad kernel: a[i] = b[i] + s * c[i].
 * Self-checking smoke benchmark for campaign plumbing tests. */
#include <stdio.h>
#include <stdlib.h>

#define N (1 << 16)
#define REPS 200

static double a[N], b[N], c[N];

int main(void) {
    for (int i = 0; i < N; i++) {
        b[i] = 1.0 + i % 7;
        c[i] = 2.0 + i % 5;
    }
    const double s = 3.0;
    for (int r = 0; r < REPS; r++)
        for (int i = 0; i < N; i++)
            a[i] = b[i] + s * c[i];
    for (int i = 0; i < N; i++) {
        if (a[i] != b[i] + s * c[i]) {
            fprintf(stderr, "triad mismatch at %d\n", i);
            return 1;
        }
    }
    printf("triad-ok n=%d reps=%d\n", N, REPS);
    return 0;
}
