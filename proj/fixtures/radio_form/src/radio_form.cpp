#include "radio_form.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>

namespace {

const char* kOptions[] = {"a", "b", "c"};

std::string state_path() {
    return "tmp/radio_state_" + std::to_string(::getpid()) + ".txt";
}

}  // namespace

RadioForm::RadioForm() {
    std::filesystem::create_directories("tmp");
}

void RadioForm::select_option(const std::string& value) {
    selection_.clear();
    for (const char* opt : kOptions) {
        if (value == opt) {
            selection_ = value;
            return;
        }
    }
}

std::string RadioForm::value() const {
    return selection_;
}

std::vector<std::string> RadioForm::selected_export_values() const {
    if (selection_.empty()) return {};
    return {selection_};
}

void RadioForm::save() const {
    std::ofstream out(state_path(), std::ios::trunc);
    out << selection_ << "\n";
}

RadioForm RadioForm::load() {
    RadioForm form;
    std::ifstream in(state_path());
    std::string line;
    if (in && std::getline(in, line)) {
        form.selection_ = line;
    }
    return form;
}
