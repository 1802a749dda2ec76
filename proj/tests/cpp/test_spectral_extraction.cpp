#include <doctest.h>

#include "cavenc/common.hpp"
