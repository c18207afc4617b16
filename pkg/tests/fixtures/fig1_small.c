// Scaled copy of fig1.c (arrays of size 4) for exhaustive enumeration.
int a_p[4], a_q[4];
int i, k;

main()
{
  for (i = 0; i < 4; i++)
  {
    k = i;
    a_p[i] = k;
    a_q[i] = k * k;
  }
  for (i = 0; i < 4; i++)
  {
    assert(a_q[i] == a_p[i] * a_p[i]);
  }
}
