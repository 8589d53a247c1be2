/* CSR sparse matrix-vector product with an indirectly indexed source
 * vector; latency-bound smoke benchmark. */
#include <stdio.h>
#include <stdlib.h>

#define ROWS 4096
#define NNZ_PER_ROW 8

int main(void) {
    int nnz = ROWS * NNZ_PER_ROW;
    int *rowptr = malloc((ROWS + 1) * sizeof(int));
    int *colidx = malloc(nnz * sizeof(int));
    double *val = malloc(nnz * sizeof(double));
    double *x = malloc(ROWS * sizeof(double));
    double *y = malloc(ROWS * sizeof(double));
    if (!rowptr || !colidx || !val || !x || !y)
        return 2;

    for (int i = 0; i < ROWS; i++)
        x[i] = 1.0 + (i % 3);
    rowptr[0] = 0;
    for (int i = 0; i < ROWS; i++) {
        for (int k = 0; k < NNZ_PER_ROW; k++) {
            int at = i * NNZ_PER_ROW + k;
            colidx[at] = (i * 37 + k * 101) % ROWS;  /* scattered columns */
            val[at] = 0.5 + (at % 9);
        }
        rowptr[i + 1] = (i + 1) * NNZ_PER_ROW;
    }
    for (int i = 0; i < ROWS; i++) {
        double acc = 0.0;
        for (int k = rowptr[i]; k < rowptr[i + 1]; k++)
            acc += val[k] * x[colidx[k]];
        y[i] = acc;
    }
    double probe = 0.0;
    for (int k = rowptr[7]; k < rowptr[8]; k++)
        probe += val[k] * x[colidx[k]];
    if (y[7] != probe) {
        fprintf(stderr, "spmv mismatch\n");
        return 1;
    }
    printf("spmv-ok rows=%d y7=%g\n", ROWS, y[7]);
    return 0;
}
