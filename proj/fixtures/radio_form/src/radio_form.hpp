#pragma once

#include <string>
#include <vector>

// A miniature document form holding one radio-button group with options
// "a", "b", "c". Selections persist through a per-process state file under
// tmp/ so a test can save the form and reload it as a fresh object.
class RadioForm {
 public:
    RadioForm();

    // Selects an option; anything outside the option set clears the selection.
    void select_option(const std::string& value);

    std::string value() const;
    std::vector<std::string> selected_export_values() const;

    void save() const;
    static RadioForm load();

 private:
    std::string selection_;
};
