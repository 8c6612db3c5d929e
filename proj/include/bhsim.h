#ifndef BHSIM_H
#define BHSIM_H

/* C interface to the backhaul scheduling simulator. All entry points are
 * thread-compatible: distinct simulations may run on distinct threads, a
 * single bhsim_sim must not be shared. Strings returned through char** are
 * heap-allocated and must be released with bhsim_free_string. */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bhsim_sim bhsim_sim;

typedef enum bhsim_status {
    BHSIM_OK = 0,
    BHSIM_ERR_CONFIG = 1,   /* malformed scenario; message names the field */
    BHSIM_ERR_RUNTIME = 2,  /* simulation invariant failed while running */
    BHSIM_ERR_ARGUMENT = 3  /* null handle or out pointer, bad call order */
} bhsim_status;

const char* bhsim_version(void);

/* Message from the most recent failing call on the calling thread. */
const char* bhsim_last_error(void);

/* Builds a simulation from scenario JSON (see README for the schema). */
bhsim_status bhsim_sim_create(const char* config_json, bhsim_sim** out);
bhsim_status bhsim_sim_create_from_file(const char* path, bhsim_sim** out);
void bhsim_sim_destroy(bhsim_sim* sim);

/* Runs the remaining configured subframes, or a bounded number of them. */
bhsim_status bhsim_sim_run(bhsim_sim* sim);
bhsim_status bhsim_sim_step(bhsim_sim* sim, long subframes);

long bhsim_sim_subframes_done(const bhsim_sim* sim);
int bhsim_sim_tree_height(const bhsim_sim* sim);

/* End-to-end delivered traffic so far, summed over all BSs. */
bhsim_status bhsim_sim_delivered_bits(const bhsim_sim* sim, long long* dl,
                                      long long* ul);

/* Delivered traffic divided by simulated wall time, in Gbps. */
bhsim_status bhsim_sim_throughput_gbps(const bhsim_sim* sim, double* dl,
                                       double* ul);

/* Run artifacts. The schedule log is only available when the scenario
 * enabled it. The output hint echoes the scenario's output field. */
bhsim_status bhsim_sim_metrics_csv(const bhsim_sim* sim, char** out);
bhsim_status bhsim_sim_queue_csv(const bhsim_sim* sim, char** out);
bhsim_status bhsim_sim_manifest(const bhsim_sim* sim, char** out);
bhsim_status bhsim_sim_schedule_log(const bhsim_sim* sim, char** out);
bhsim_status bhsim_sim_output_hint(const bhsim_sim* sim, char** out);

void bhsim_free_string(char* s);

/* Replays a schedule log through the independent checker. On success,
 * *violations holds the violation count and *report a newline-separated
 * listing (empty when clean). report_count and schedule_count are optional
 * and receive how many report and grant records the log carried. */
bhsim_status bhsim_validate_log(const char* log_text, char** report,
                                long* violations, long* report_count,
                                long* schedule_count);

/* Emits a random tree topology in the text form scenarios accept. */
bhsim_status bhsim_generate_topology(int num_nodes, int max_children,
                                     double interference_pair_fraction,
                                     double multihop_fraction,
                                     unsigned long long seed,
                                     long long rate_per_slot, char** out);

#ifdef __cplusplus
}
#endif

#endif /* BHSIM_H */
