#ifndef MCTRACK_H
#define MCTRACK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every entry point.
typedef enum MctStatus {
  Ok = 0,
  NullArgument = 1,
  InvalidUtf8 = 2,
  Io = 3,
  Parse = 4,
  Validate = 5,
  Pipeline = 6,
} MctStatus;

// Opaque run configuration.
typedef struct MctConfig MctConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len` bytes). Returns the full message length in bytes.
//
// # Safety
// `buf` must point to `len` writable bytes, or be null (query mode).
uintptr_t mct_last_error_message(char *buf, uintptr_t len);

// Allocate a configuration with default values. Free with `mct_config_free`.
struct MctConfig *mct_config_new(void);

// # Safety
// `config` must come from `mct_config_new` and not be freed twice.
void mct_config_free(struct MctConfig *config);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_eta(struct MctConfig *config, int64_t value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_epsilon(struct MctConfig *config, double value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_k1(struct MctConfig *config, double value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_k2(struct MctConfig *config, double value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_lambda(struct MctConfig *config, double value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_gamma(struct MctConfig *config, uint64_t value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_iou_threshold(struct MctConfig *config, double value);

// Nonzero enables the same-camera similarity compensation.
//
// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_equalize(struct MctConfig *config, int32_t value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_p_min(struct MctConfig *config, double value);

// # Safety
// `config` must be a live handle from `mct_config_new`.
enum MctStatus mct_config_set_seed(struct MctConfig *config, uint64_t value);

// Associate tracklets into global trajectories. `out_hypotheses` may be null
// to skip the per-frame expansion file.
//
// # Safety
// All non-null pointers must be valid NUL-terminated strings; `config` must
// be a live handle.
enum MctStatus mct_track(const struct MctConfig *config,
                         const char *tracklets_path,
                         const char *topology_path,
                         const char *out_trajectories,
                         const char *out_hypotheses);

// Score a hypothesis file against ground truth; writes the report file and,
// when `mcta_out` is non-null, stores the MCTA value there.
//
// # Safety
// Pointer arguments as in `mct_track`; `mcta_out` may be null.
enum MctStatus mct_evaluate(const struct MctConfig *config,
                            const char *gt_path,
                            const char *hyp_path,
                            int32_t identity_match,
                            const char *out_report,
                            double *mcta_out);

// Generate a deterministic synthetic scenario from the configured seed.
//
// # Safety
// Pointer arguments as in `mct_track`.
enum MctStatus mct_synth(const struct MctConfig *config,
                         uint32_t n_cameras,
                         uint32_t n_targets,
                         double fragmentation,
                         double appearance_shift,
                         const char *out_tracklets,
                         const char *out_topology,
                         const char *out_gt);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MCTRACK_H */
