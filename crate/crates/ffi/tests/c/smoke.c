#include <math.h>
#include <stdio.h>
#include "qfilter.h"

#define CHECK(cond)                                        \
    do {                                                   \
        if (!(cond)) {                                     \
            fprintf(stderr, "failed: %s\n", #cond);        \
            return 1;                                      \
        }                                                  \
    } while (0)

int main(void) {
    const double left_re[4] = {1, 0, 0, 0}, mixed_re[4] = {0.5, 0, 0, 0.5}, im[4] = {0};
    QfDensity *left = NULL, *mixed = NULL;
    CHECK(qf_density_new(left_re, im, 2, &left) == QF_STATUS_OK);
    CHECK(qf_density_new(mixed_re, im, 2, &mixed) == QF_STATUS_OK);

    double s = 0;
    CHECK(qf_relative_entropy(left, mixed, &s) == QF_STATUS_OK);
    CHECK(fabs(s - log(2.0)) < 1e-12);
    CHECK(qf_relative_entropy(mixed, left, &s) == QF_STATUS_OK && isinf(s));

    QfSimConfig cfg = {1.0, 0.0, 0.005, 1.0, 2000, 20, 42};
    QfTrajectory *traj = NULL;
    CHECK(qf_trajectory_run(&cfg, &traj) == QF_STATUS_OK);
    CHECK(qf_trajectory_len(traj) == 21);
    QfTrajectoryRow row;
    CHECK(qf_trajectory_row(traj, 20, &row) == QF_STATUS_OK);
    CHECK(row.p_l_real >= 0.0 && row.p_l_real <= 1.0);
    CHECK(qf_trajectory_row(traj, 21, &row) == QF_STATUS_OUT_OF_RANGE);

    char msg[128];
    CHECK(qf_last_error(msg, sizeof msg) > 0);

    qf_trajectory_free(traj);
    qf_density_free(left);
    qf_density_free(mixed);
    printf("ok %s\n", qf_version());
    return 0;
}
