#include <math.h>
#include <stdio.h>
#include "qconc.h"

#define CHECK(cond, msg) do { if (!(cond)) { fprintf(stderr, "%s: %s\n", msg, qconc_last_error()); return 1; } } while (0)

int main(void) {
    double h = 0.70710678118654752;
    double bell[8] = {h, 0, 0, 0, 0, 0, h, 0};
    QconcPureState *psi = NULL;
    CHECK(qconc_pure_new(2, bell, &psi) == QCONC_STATUS_OK, "pure_new");
    double e = 0;
    CHECK(qconc_pure_eof(psi, &e) == QCONC_STATUS_OK && fabs(e - 1.0) < 1e-12, "eof");

    QconcDensity *rho = NULL;
    CHECK(qconc_density_werner(0.5, &rho) == QCONC_STATUS_OK, "werner");
    double d = 0;
    CHECK(qconc_density_bound(rho, 1, 2, true, &d) == QCONC_STATUS_OK && fabs(d - 0.25) < 1e-12, "bound");

    CHECK(qconc_density_eof_bound(rho, 1, 5, &d) == QCONC_STATUS_INVALID_INPUT, "eof_bound n=5");
    CHECK(qconc_last_error()[0] != '\0', "message");

    qconc_density_free(rho);
    qconc_pure_free(psi);
    printf("ok %s\n", qconc_version());
    return 0;
}
