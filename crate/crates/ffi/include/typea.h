#ifndef TYPEA_H
#define TYPEA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status code of every call.
 */
typedef enum TypeaStatus {
  /*
   The call succeeded. For calls producing a report this says nothing
   about whether its checks passed; see [`typea_report_passed`].
   */
  TYPEA_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  TYPEA_STATUS_NULL_POINTER = 1,
  /*
   A string argument was not valid UTF-8.
   */
  TYPEA_STATUS_INVALID_UTF8 = 2,
  /*
   Input text could not be parsed.
   */
  TYPEA_STATUS_PARSE = 3,
  /*
   Parameters outside the supported range.
   */
  TYPEA_STATUS_INVALID_ARGUMENT = 4,
  /*
   The computation failed.
   */
  TYPEA_STATUS_COMPUTATION = 5,
  /*
   An internal panic was caught at the boundary.
   */
  TYPEA_STATUS_PANIC = 6,
} TypeaStatus;

/*
 A finite A-infinity algebra given by structure tables.
 */
typedef struct TypeaAinf TypeaAinf;

/*
 A verification report: named checks with anchors and exact witnesses.
 */
typedef struct TypeaReport TypeaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *typea_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a pointer obtained from this library and not yet freed.
 */
void typea_string_free(char *s);

/*
 Explicit Gröbner family, β-relations and (optionally) the invariant-ring
 checks for type (n, a).

 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
enum TypeaStatus typea_jacobian(uintptr_t n,
                                uint32_t a,
                                bool specialize_r,
                                struct TypeaReport **out);

/*
 Critical points, values and the dual group action of the superpotential.

 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
enum TypeaStatus typea_superpotential(uintptr_t n,
                                      uint32_t a,
                                      bool hessians,
                                      struct TypeaReport **out);

/*
 Frobenius checks and spectrum matching for the hyperplane algebra.

 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
enum TypeaStatus typea_quantum_hyperplane(uintptr_t n, uint32_t a, struct TypeaReport **out);

/*
 The cubic surface suite.

 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
enum TypeaStatus typea_quantum_cubic(struct TypeaReport **out);

/*
 Reduced Gröbner basis of newline- or `;`-separated polynomials.
 `order` is `lex:x>y>...`, `deglex:...` or `block:a>b|c>d`.

 # Safety
 `text` and `order` must be null-terminated strings; `out` must be a valid
 pointer to writable storage for a handle.
 */
enum TypeaStatus typea_groebner(const char *text, const char *order, struct TypeaReport **out);

/*
 Hochschild cohomology of `Cl(form)` up to `s_max` from the bar complex.
 `form` is `diag:q1,...,qn`.

 # Safety
 `form` must be a null-terminated string; `out` must be a valid pointer to
 writable storage for a handle.
 */
enum TypeaStatus typea_clifford_hh(const char *form,
                                   uintptr_t s_max,
                                   bool koszul_signs,
                                   struct TypeaReport **out);

/*
 Minimal model of the Koszul matrix factorization with the type checks.
 When `tables` is not null it receives the transferred A-infinity algebra
 (null if the computation stopped before producing it).

 # Safety
 `out` must be a valid pointer to writable storage for a handle; `tables`
 must be null or such a pointer.
 */
enum TypeaStatus typea_minimal_model(uintptr_t n,
                                     uint32_t a,
                                     uint32_t rdeg,
                                     uintptr_t arity,
                                     bool stability_check,
                                     struct TypeaReport **out,
                                     struct TypeaAinf **tables);

/*
 Whether every check in the report passed. False for a null handle.

 # Safety
 `report` must be null or a live handle.
 */
bool typea_report_passed(const struct TypeaReport *report);

/*
 Number of checks in the report. Zero for a null handle.

 # Safety
 `report` must be null or a live handle.
 */
uintptr_t typea_report_check_count(const struct TypeaReport *report);

/*
 The report as deterministic JSON. Free with [`typea_string_free`].

 # Safety
 `report` must be a live handle; `out` must be a valid pointer.
 */
enum TypeaStatus typea_report_json(const struct TypeaReport *report, char **out);

/*
 The human-readable rendering of the report. Free with [`typea_string_free`].

 # Safety
 `report` must be a live handle; `out` must be a valid pointer.
 */
enum TypeaStatus typea_report_text(const struct TypeaReport *report, char **out);

/*
 Releases a report. Null is ignored.

 # Safety
 `report` must be null or a handle from this library not yet freed.
 */
void typea_report_free(struct TypeaReport *report);

/*
 Parses A-infinity tables in the text format written by the command line.

 # Safety
 `text` must be a null-terminated string; `out` must be a valid pointer.
 */
enum TypeaStatus typea_ainf_from_text(const char *text, struct TypeaAinf **out);

/*
 The tables in text format. Free with [`typea_string_free`].

 # Safety
 `alg` must be a live handle; `out` must be a valid pointer.
 */
enum TypeaStatus typea_ainf_to_text(const struct TypeaAinf *alg, char **out);

/*
 Dimension of the underlying module. Zero for a null handle.

 # Safety
 `alg` must be null or a live handle.
 */
uintptr_t typea_ainf_dim(const struct TypeaAinf *alg);

/*
 Checks the A-infinity relations up to `max_arity` (0 means all arities in
 the tables).

 # Safety
 `alg` must be a live handle; `out` must be a valid pointer.
 */
enum TypeaStatus typea_ainf_verify(const struct TypeaAinf *alg,
                                   uintptr_t max_arity,
                                   struct TypeaReport **out);

/*
 Releases an algebra. Null is ignored.

 # Safety
 `alg` must be null or a handle from this library not yet freed.
 */
void typea_ainf_free(struct TypeaAinf *alg);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TYPEA_H */
