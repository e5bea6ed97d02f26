#include <stdio.h>
#include <string.h>
#include "clausegym.h"

int main(void) {
    const char *text = "cnf(a, axiom, p(a)).\ncnf(b, negated_conjecture, ~p(a)).\n";
    CgEnv *env = NULL;
    if (cg_env_from_text("min", text, 10, 20, 0, &env) != CG_STATUS_OK) {
        fprintf(stderr, "create: %s\n", cg_last_error());
        return 1;
    }
    char *json = NULL;
    if (cg_env_reset(env, NULL, &json) != CG_STATUS_OK) return 1;
    cg_string_free(json);
    for (size_t action = 0; action < 3; action++) {
        if (cg_env_step(env, action, &json) != CG_STATUS_OK) return 1;
        if (action == 2) printf("%s\n", strstr(json, "\"reward\":1.0") ? "refuted" : "open");
        cg_string_free(json);
    }
    CgStatus late = cg_env_step(env, 0, &json);
    printf("%d %s\n", (int)late, cg_last_error());
    cg_env_free(env);
    return 0;
}
