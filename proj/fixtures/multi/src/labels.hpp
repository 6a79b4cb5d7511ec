#pragma once

#include <optional>
#include <string>

// Renders a qualified label: [ns|]prefix:name=value. A null namespace means
// the label is unqualified.
std::string make_label(const std::optional<std::string>& ns, const std::string& prefix,
                       const std::string& name, const std::string& value);

// Buckets a scale factor: 0 below 2.0, 1 in [2.0, 4.0), 2 otherwise
// (including NaN, which compares false everywhere).
int scale_bucket(double factor);
