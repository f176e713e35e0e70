#ifndef HADAMARD_PROX_H
#define HADAMARD_PROX_H

/*
 * C interface to hadamard-prox.
 *
 * Points are arrays of hp_space_point_len(space) doubles:
 *   Euclidean   the coordinates
 *   half-plane  [re, im], im > 0
 *   tree        [edge index, offset from the edge's first endpoint]
 *
 * Fallible calls return an HpStatus. hp_last_error_message() returns a copy
 * of the last error on the calling thread; free it with hp_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t HpStatus;

#define HP_OK 0
#define HP_ERR_NULL 1
#define HP_ERR_DOMAIN 2
#define HP_ERR_NUMERIC 3
#define HP_ERR_CONFIG 4
#define HP_ERR_PANIC 5
#define HP_ERR_IO 6

#define HP_FN_DISTANCE 0
#define HP_FN_HALF_SQUARED_DISTANCE 1
#define HP_FN_INDICATOR_BALL 2

typedef struct HpSpace HpSpace;

const char *hp_version(void);

/* Constructors return NULL on error. */
HpSpace *hp_space_euclidean(size_t dim);
HpSpace *hp_space_half_plane(void);
/* One "u v length" edge per line. */
HpSpace *hp_space_tree(const char *edge_list);
void hp_space_free(HpSpace *space);

size_t hp_space_point_len(const HpSpace *space);
HpStatus hp_tree_vertex(const HpSpace *space, const char *label, double *out);

HpStatus hp_distance(const HpSpace *space, const double *x, const double *y, double *out);
HpStatus hp_convex_combination(const HpSpace *space, const double *x, const double *y, double alpha,
                               double *out);
HpStatus hp_comparison_angle(const HpSpace *space, const double *p, const double *x, const double *y,
                             double *out);
HpStatus hp_alexandrov_angle(const HpSpace *space, const double *p, const double *x, const double *y,
                             double *out);

/* radius is read only for HP_FN_INDICATOR_BALL. */
HpStatus hp_prox(const HpSpace *space, int32_t kind, const double *anchor, double radius, double lambda,
                 const double *x, double *out);

/*
 * Runs a JSON experiment config. base_dir may be NULL. On HP_OK and
 * HP_ERR_NUMERIC *summary_json is set to the summary JSON (free with
 * hp_string_free), otherwise to NULL.
 */
HpStatus hp_run_experiment(const char *config_json, const char *base_dir, char **summary_json);

char *hp_last_error_message(void);
void hp_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif
