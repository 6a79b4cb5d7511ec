#include "radio_form.hpp"

// Drives the form the way end users do: lots of selections, most of them
// from other button groups, none of them "a".
int main() {
    RadioForm form;
    const char* values[] = {"Off", "Yes", "c", "On", "1", "2",
                            "x",   "y",   "z", "no", "maybe"};
    for (const char* v : values) {
        form.select_option(v);
    }
    form.save();
    return 0;
}
