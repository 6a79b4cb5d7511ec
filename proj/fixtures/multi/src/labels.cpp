#include "labels.hpp"

std::string make_label(const std::optional<std::string>& ns, const std::string& prefix,
                       const std::string& name, const std::string& value) {
    std::string out;
    if (ns) {
        out += *ns;
        out += '|';
    }
    out += prefix;
    out += ':';
    out += name;
    out += '=';
    out += value;
    return out;
}

int scale_bucket(double factor) {
    if (factor < 2.0) return 0;
    if (factor < 4.0) return 1;
    return 2;
}
