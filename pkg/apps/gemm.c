/* Naive single-precision matrix multiply, C = A*B, self-checked against
 * a row recomputation. Compute-bound smoke benchmark. */
#include <stdio.h>
#include <stdlib.h>

#define N 96

static float A[N][N], B[N][N], C[N][N];

int main(void) {
    for (int i = 0; i < N; i++)
        for (int j = 0; j < N; j++) {
            A[i][j] = (float)((i + j) % 13) * 0.5f;
            B[i][j] = (float)((i * j) % 7) * 0.25f;
        }
    for (int i = 0; i < N; i++)
        for (int j = 0; j < N; j++) {
            float acc = 0.0f;
            for (int k = 0; k < N; k++)
                acc += A[i][k] * B[k][j];
            C[i][j] = acc;
        }
    float check = 0.0f;
    for (int k = 0; k < N; k++)
        check += A[N / 2][k] * B[k][N / 3];
    if (C[N / 2][N / 3] != check) {
        fprintf(stderr, "gemm mismatch\n");
        return 1;
    }
    printf("gemm-ok n=%d c=%g\n", N, (double)C[N / 2][N / 3]);
    return 0;
}
