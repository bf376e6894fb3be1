from ncsym.cli import main

main()
