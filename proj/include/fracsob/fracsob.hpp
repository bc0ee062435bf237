#pragma once

#include "fracsob/abscont.hpp"
#include "fracsob/fft.hpp"
#include "fracsob/field.hpp"
#include "fracsob/geometry.hpp"
#include "fracsob/hodge.hpp"
#include "fracsob/io.hpp"
#include "fracsob/jacobian.hpp"
#include "fracsob/mollify.hpp"
#include "fracsob/parallel.hpp"
#include "fracsob/scenarios.hpp"
#include "fracsob/sobolev.hpp"
#include "fracsob/spectral.hpp"
#include "fracsob/suite.hpp"
