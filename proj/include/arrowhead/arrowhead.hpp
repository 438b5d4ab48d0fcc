#pragma once

#include "arrowhead/adi.hpp"
#include "arrowhead/assembly.hpp"
#include "arrowhead/b3_matrix.hpp"
#include "arrowhead/banded_matrix.hpp"
#include "arrowhead/burgers.hpp"
#include "arrowhead/elliptic.hpp"
#include "arrowhead/error.hpp"
#include "arrowhead/matrix.hpp"
#include "arrowhead/mesh.hpp"
#include "arrowhead/parallel.hpp"
#include "arrowhead/pcg.hpp"
#include "arrowhead/reference_basis.hpp"
#include "arrowhead/spectral_bounds.hpp"
#include "arrowhead/transforms.hpp"
