#include "pencilcrt/error.hpp"

namespace pencilcrt {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InsufficientSamples: return "insufficient-samples";
    case ErrorKind::OrderDeficient: return "order-deficient";
    case ErrorKind::DegenerateBasis: return "degenerate-basis";
    case ErrorKind::Cardinality: return "cardinality";
    case ErrorKind::InvalidComponent: return "invalid-component";
    case ErrorKind::NoCandidate: return "no-candidate";
    case ErrorKind::Ambiguous: return "ambiguous";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

OrderDeficientError::OrderDeficientError(std::size_t requested, std::size_t achieved)
    : Error(ErrorKind::OrderDeficient,
            "pencil rank " + std::to_string(achieved) + " below requested order " +
                std::to_string(requested)),
      requested_(requested),
      achieved_(achieved) {}

}  // namespace pencilcrt
