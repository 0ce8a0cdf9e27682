#pragma once

#include "steklov/assembly.hpp"
#include "steklov/coefficients.hpp"
#include "steklov/correction.hpp"
#include "steklov/dofmap.hpp"
#include "steklov/elements.hpp"
#include "steklov/geometry.hpp"
#include "steklov/gevp.hpp"
#include "steklov/interpolation.hpp"
#include "steklov/mesh.hpp"
#include "steklov/quadrature.hpp"
#include "steklov/study.hpp"
