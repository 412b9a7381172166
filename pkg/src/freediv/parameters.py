#  -*- coding: utf-8 -*-

"""
    This script contains all freediv parameters with their default values.
    Every function of the package reads its numerical options from here when they are not given explicitly, so that a
    scenario file (see 'tool/running_scenarios.py') can update them all at once.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

# Fixing the random seed for reproducing the same random draws:
random_seed = 1

#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# Coefficient algebra B = M_d(C):
#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx

# Default matrix size d of the coefficient algebra (dimensionless):
#------------------------------------------------------------------
dim = 2

# Relative threshold on the smallest singular value below which a matrix is declared singular (dimensionless):
#-------------------------------------------------------------------------------------------------------------
singular_tolerance = 1e-12
# => a matrix x is refused by 'invert' when s_min(x) < singular_tolerance * ||x||.

# Largest accepted condition number when inverting a matrix (dimensionless):
#---------------------------------------------------------------------------
condition_number_cap = 1e12

#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# Truncated distributions:
#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx

# Default truncation order of moments and cumulants (number of letters X in the longest stored word):
#-----------------------------------------------------------------------------------------------------
N_max = 8
# => NC(8) has 1430 partitions, which keeps every moment-cumulant sum exact and fast.

# Largest order accepted by the enumeration of non-crossing partitions:
#----------------------------------------------------------------------
N_enumeration_limit = 12

# Largest number of complex entries allowed in one stored tensor:
#----------------------------------------------------------------
max_tensor_entries = 2 ** 23
# => With d = 2 every order up to 11 fits; with d = 3 orders are limited to 7.

# Number of random unit-norm argument tuples used on top of the matrix-unit basis when checking bounds:
#-------------------------------------------------------------------------------------------------------
n_random_bound_samples = 20

# Tolerance used when checking identities that hold exactly in exact arithmetic (dimensionless):
#-----------------------------------------------------------------------------------------------
identity_tolerance = 1e-10

#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# Transforms and fixed-point iterations:
#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx

# Default number of terms kept in the Cauchy and Voiculescu series:
#------------------------------------------------------------------
tail_order = 8

# Stopping tolerance of the fixed-point iterations (operator norm of the last step):
#-----------------------------------------------------------------------------------
fixed_point_tol = 1e-10

# Maximal number of fixed-point iterations before declaring a failure:
#---------------------------------------------------------------------
fixed_point_max_iter = 500

# Damping factor applied to a fixed-point step whenever the residual increases:
#------------------------------------------------------------------------------
fixed_point_damping = 0.5

# Tolerance on the half-plane inequalities Im F(b) >= Im b and Im G(b) <= 0:
#---------------------------------------------------------------------------
half_plane_tolerance = 1e-8

# Label written in sweep files to recall the sign convention of the Cauchy transform:
#------------------------------------------------------------------------------------
cauchy_convention = "resolvent(b-X)"

#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# Steinitz rearrangement and subset selection:
#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx

# Tolerance on the zero-sum hypothesis and on the norm caps of the input vectors:
#--------------------------------------------------------------------------------
steinitz_tol = 1e-9

# Slack allowed when comparing a measured prefix norm or deviation to its certified bound:
#-----------------------------------------------------------------------------------------
certificate_tol = 1e-6

# Largest number of vectors for which the subset selection may be cross-checked by exhaustive search:
#----------------------------------------------------------------------------------------------------
exhaustive_search_limit = 18

#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx
# Divisibility experiment:
#xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx

# Default number of probes c_n = d_n + i*lambda*I:
#-------------------------------------------------
probe_count = 4

# Default ratio between lambda and the exponential bound M (must be strictly larger than 16):
#--------------------------------------------------------------------------------------------
probe_lambda_factor = 17.

# Default divisibility order p (the experiment looks for a convolution root of order p):
#----------------------------------------------------------------------------------------
divisibility_order = 2

# Default row sizes n_i of the triangular array:
#-----------------------------------------------
row_sizes = [4, 16, 64]

# Default magnitude of the cumulant noise injected in array entries (the noise of one entry of row i is
# noise_scale / n_i ** 2):
#------------------------------------------------------------------------------------------------------
noise_scale = 0.

# Smallest eigenvalue accepted when checking the positivity of a Gram or block matrix:
#-------------------------------------------------------------------------------------
positivity_tol = 1e-8

# Default largest degree of the monomials used by the condition checkers:
#------------------------------------------------------------------------
degree_cutoff = 2

# Default number of parallel processes used for the rows of an experiment:
#-------------------------------------------------------------------------
jobs = 1
