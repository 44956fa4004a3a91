#include "sdt/tuning.hpp"

// Header-only definitions; this translation unit just type-checks them once.
