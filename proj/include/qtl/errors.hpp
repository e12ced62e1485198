#pragma once

#include <stdexcept>
#include <string>

namespace qtl {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define QTL_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    };

QTL_DEFINE_ERROR(NotHermitian)
QTL_DEFINE_ERROR(NotPSD)
QTL_DEFINE_ERROR(DimMismatch)
QTL_DEFINE_ERROR(NumericalFailure)
QTL_DEFINE_ERROR(ArityMismatch)
QTL_DEFINE_ERROR(GridTooLarge)
QTL_DEFINE_ERROR(DegenerateSpec)
QTL_DEFINE_ERROR(InvalidTask)
QTL_DEFINE_ERROR(EmptyDataset)
QTL_DEFINE_ERROR(UnalignedSupport)
QTL_DEFINE_ERROR(NotOneTimeEncoding)
QTL_DEFINE_ERROR(ConfigInvalid)

#undef QTL_DEFINE_ERROR

}  // namespace qtl
