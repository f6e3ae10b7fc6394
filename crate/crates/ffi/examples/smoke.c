/* Build: cargo build -p ssg-ffi
 *        cc crates/ffi/examples/smoke.c -Icrates/ffi/include target/debug/libssg_ffi.a -lpthread -ldl -lm -o smoke */
#include <stdio.h>
#include "ssg.h"

int main(void) {
    SsgGroup *g = NULL;
    SsgElement *a = NULL;
    bool trivial = false;
    char buf[64];
    size_t needed = 0;

    if (ssg_group_builtin("grigorchuk", &g) != SSG_STATUS_OK) return 1;
    ssg_word_is_trivial(g, "b.c.d", &trivial);
    printf("b.c.d is %s\n", trivial ? "trivial" : "nontrivial");

    ssg_element_from_word(g, "a", &a);
    if (ssg_element_evaluate(a, "(1)", buf, sizeof buf, &needed) == SSG_STATUS_OK)
        printf("a((1)) = %s\n", buf);

    if (ssg_element_evaluate(a, "(2)", buf, sizeof buf, &needed) != SSG_STATUS_OK) {
        ssg_last_error(buf, sizeof buf, &needed);
        printf("error: %s\n", buf);
    }
    ssg_element_free(a);
    ssg_group_free(g);
    return 0;
}
