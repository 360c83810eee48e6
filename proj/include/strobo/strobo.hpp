#pragma once

#include "strobo/error.hpp"
#include "strobo/scalar.hpp"
#include "strobo/matrix.hpp"
#include "strobo/spectral.hpp"
#include "strobo/weyr.hpp"
#include "strobo/lindblad.hpp"
#include "strobo/cyclicity.hpp"
