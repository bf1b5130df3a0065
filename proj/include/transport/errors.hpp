#pragma once

#include <stdexcept>
#include <string>

namespace transport {

// Error taxonomy. Validation errors are raised for malformed inputs and
// precondition violations; identification errors are raised when the
// requested quantity is not identified from the supplied data.
enum class ErrorClass { Validation, Identification };

class Error : public std::runtime_error {
public:
    Error(std::string code, std::string message,
          ErrorClass cls = ErrorClass::Validation)
        : std::runtime_error(code + ": " + message),
          code_(std::move(code)), class_(cls) {}

    const std::string& code() const { return code_; }
    ErrorClass error_class() const { return class_; }

private:
    std::string code_;
    ErrorClass class_;
};

#define TRANSPORT_ERROR(Name, Class)                                   \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& message)                      \
            : Error(#Name, message, ErrorClass::Class) {}              \
    }

TRANSPORT_ERROR(EmptyCell, Validation);
TRANSPORT_ERROR(UndefinedMeasure, Validation);
TRANSPORT_ERROR(ParseError, Validation);
TRANSPORT_ERROR(CycleError, Validation);
TRANSPORT_ERROR(RoleError, Validation);
TRANSPORT_ERROR(SelectionAfterTreatment, Validation);
TRANSPORT_ERROR(UnknownNode, Validation);
TRANSPORT_ERROR(NonBaselineCandidate, Validation);
TRANSPORT_ERROR(NonCollapsibleMeasure, Validation);
TRANSPORT_ERROR(WeightMismatch, Validation);
TRANSPORT_ERROR(RiskOutOfRange, Identification);
TRANSPORT_ERROR(PositivityViolation, Identification);
TRANSPORT_ERROR(ZeroBaselineRisk, Identification);
TRANSPORT_ERROR(DegenerateBaseline, Identification);
TRANSPORT_ERROR(MonotonicityContradicted, Identification);
TRANSPORT_ERROR(SeparationDetected, Identification);
TRANSPORT_ERROR(RankDeficient, Validation);
TRANSPORT_ERROR(NotConverged, Validation);
TRANSPORT_ERROR(TooLarge, Validation);
TRANSPORT_ERROR(InfeasibleScenario, Validation);
TRANSPORT_ERROR(AdjustmentNotFound, Identification);

#undef TRANSPORT_ERROR

} // namespace transport
