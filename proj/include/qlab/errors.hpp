#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

/// Thrown when an exact/enumerative operation is asked to run beyond the
/// configured desk-scale budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qlab
