// Umbrella header (everything except the JSON scenario layer in io.hpp).
#pragma once

#include <qgerbe/cech.hpp>
#include <qgerbe/charclass.hpp>
#include <qgerbe/cocycle.hpp>
#include <qgerbe/cover.hpp>
#include <qgerbe/errors.hpp>
#include <qgerbe/geometry.hpp>
#include <qgerbe/kernels.hpp>
#include <qgerbe/mesh.hpp>
#include <qgerbe/quadrature.hpp>
#include <qgerbe/trivialisation.hpp>
#include <qgerbe/verify.hpp>
