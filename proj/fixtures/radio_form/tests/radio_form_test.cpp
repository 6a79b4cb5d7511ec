#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "radio_form.hpp"

TEST_CASE("testRadioButtons") {
    RadioForm form1;
    form1.select_option("b");
    form1.save();
    RadioForm form2 = RadioForm::load();
    CHECK(form2.value() == "b");
    CHECK(form2.selected_export_values().size() == 1);
}
